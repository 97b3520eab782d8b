"""
Files written by the commands. Everything goes through a temporary file in
the target directory and os.replace, so readers never see a partial file.
"""

import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Union

import numpy as np

from .classify import format_number
from .documents import dumps
from .selector_grid import ScalarField, SelectionReport

logger = logging.getLogger(__name__)

CSV_HEADER = ['eps', 'F', 'G', 'pnorm', 'lambda_hat']


def write_atomic(path: Union[str, Path], data: Union[str, bytes]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode('utf-8') if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug(f"Wrote {len(payload)} bytes to {path}")


def write_json(path, doc):
    write_atomic(path, dumps(doc))


def report_csv(report: SelectionReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(CSV_HEADER)
    for row in report.rows():
        writer.writerow(['' if v is None else format_number(v) for v in row])
    return buffer.getvalue()


def write_report_csv(path, report: SelectionReport):
    write_atomic(path, report_csv(report))


def pgm_bytes(x: ScalarField) -> bytes:
    """8-bit binary PGM, values scaled linearly onto 0..255 over the mask; outside cells are black."""
    values = x.masked_values
    lo, hi = (float(values.min()), float(values.max())) if values.size else (0.0, 0.0)
    span = hi - lo if hi > lo else 1.0
    image = np.zeros(x.shape, dtype=np.uint8)
    scaled = np.clip(np.rint((x.values - lo) / span * 255.0), 0, 255).astype(np.uint8)
    image[x.mask] = scaled[x.mask]
    # Image rows run top to bottom; grid rows run bottom to top.
    header = f'P5\n{x.nx} {x.ny}\n255\n'.encode('ascii')
    return header + np.flipud(image).tobytes()


def write_pgm(path, x: ScalarField):
    write_atomic(path, pgm_bytes(x))


def write_field_dump(directory, stem: str, x: ScalarField):
    """Row-major float64 values, a uint8 mask file and a JSON sidecar."""
    directory = Path(directory)
    values_file = f'{stem}.f64'
    mask_file = f'{stem}.mask'
    write_atomic(directory / values_file, np.ascontiguousarray(x.values, dtype='<f8').tobytes())
    write_atomic(directory / mask_file, np.ascontiguousarray(x.mask, dtype=np.uint8).tobytes())
    sidecar = {
        'nx': x.nx,
        'ny': x.ny,
        'spacing': x.spacing,
        'origin': list(x.origin),
        'values_file': values_file,
        'mask_file': mask_file,
    }
    write_atomic(directory / f'{stem}.json', json.dumps(sidecar, sort_keys=True, indent=2) + '\n')


def read_field_dump(sidecar_path) -> ScalarField:
    sidecar_path = Path(sidecar_path)
    meta = json.loads(sidecar_path.read_text())
    shape = (meta['ny'], meta['nx'])
    values = np.fromfile(sidecar_path.parent / meta['values_file'], dtype='<f8').reshape(shape)
    mask = np.fromfile(sidecar_path.parent / meta['mask_file'], dtype=np.uint8).reshape(shape).astype(bool)
    return ScalarField(nx=meta['nx'], ny=meta['ny'], spacing=meta['spacing'], mask=mask,
                       values=values, origin=tuple(meta['origin']))
