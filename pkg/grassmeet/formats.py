# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import json
import os

import pandas as pd

from grassmeet.ffield import (
    MatrixFF, PrimeField, format_matrix_text, parse_matrix_text
)
from grassmeet.grassmann import SmoothnessCertificate
from grassmeet.utils import InvalidInput

# keys of the JSON certificate written by `grassmeet certify` and
# `grassmeet search`; `millis` is absent when timings are suppressed
CERTIFICATE_SCHEMA = {
    'prime': int,
    'matrix_sha': str,
    'patches': list,
    'smooth': bool,
}
PATCH_SCHEMA = {
    'pivot': str,
    'unit_ideal': (bool, type(None)),
    'pairs': int,
    'max_degree': int,
}


def _read_text(path) -> str:
    if not path or not os.path.isfile(path):
        raise InvalidInput(f'{path} is not a file.')
    with open(path, 'r', encoding='utf-8') as fh:
        return fh.read()


def check_matrix_text(text: str, level: str = 'max'):
    """Checks the line layout of a matrix file.

    `rows cols` on the first line, then one whitespace-separated row
    per line. With level 'min' only the header and the row count are
    looked at.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise InvalidInput(
            'The first line must hold the matrix dimensions "rows cols".')
    try:
        rows, cols = (int(x) for x in lines[0])
    except ValueError:
        raise InvalidInput('Matrix dimensions must be integers.')
    body = lines[1:]
    if len(body) != rows:
        raise InvalidInput(f'Expected {rows} rows, found {len(body)}.')
    if level == 'min':
        return
    for i, row in enumerate(body, start=1):
        if len(row) != cols:
            raise InvalidInput(
                f'Row {i} has {len(row)} entries instead of {cols}.')
        try:
            [int(x) for x in row]
        except ValueError:
            raise InvalidInput(f'Row {i} contains a non-integer entry.')


def read_matrix(path, field: PrimeField) -> MatrixFF:
    text = _read_text(path)
    check_matrix_text(text)
    return parse_matrix_text(text, field)


def write_matrix(m: MatrixFF, path, centered: bool = False) -> str:
    with open(path, 'w', encoding='utf-8') as fh:
        fh.write(format_matrix_text(m, centered))
    return str(path)


def validate_certificate(data: dict):
    """Checks a certificate dictionary against the JSON schema.

    {"prime": int, "matrix_sha": str, "smooth": bool,
     "patches": [{"pivot": "x01", "unit_ideal": bool | null,
                  "pairs": int, "max_degree": int, "millis": float}, ...]}
    """
    missing = [k for k in CERTIFICATE_SCHEMA if k not in data]
    if missing:
        raise InvalidInput(
            'Some required keys are missing from the certificate: '
            f'{", ".join(missing)}.'
        )
    for key, kind in CERTIFICATE_SCHEMA.items():
        if not isinstance(data[key], kind):
            raise InvalidInput(f'"{key}" has the wrong type.')
    for i, patch in enumerate(data['patches']):
        missing = [k for k in PATCH_SCHEMA if k not in patch]
        if missing:
            raise InvalidInput(f'Patch {i} is missing: {", ".join(missing)}.')
        for key, kind in PATCH_SCHEMA.items():
            if not isinstance(patch[key], kind):
                raise InvalidInput(f'Patch {i}: "{key}" has the wrong type.')
    if data['smooth'] and not all(
            p['unit_ideal'] is True for p in data['patches']):
        raise InvalidInput('A smooth certificate needs a unit ideal '
                           'in every patch.')


def load_certificate(path) -> dict:
    try:
        data = json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidInput(f'Certificate is not valid JSON: {e}')
    validate_certificate(data)
    return data


def certificate_to_dict(cert: SmoothnessCertificate,
                        timings: bool = True) -> dict:
    data = cert.to_dict(timings)
    validate_certificate(data)
    return data


def write_certificate(cert: SmoothnessCertificate, path,
                      timings: bool = True) -> str:
    with open(path, 'w', encoding='utf-8') as fh:
        json.dump(certificate_to_dict(cert, timings), fh, indent=2,
                  sort_keys=True)
    return str(path)


def certificate_frame_from_file(path) -> pd.DataFrame:
    data = load_certificate(path)
    df = pd.DataFrame(data['patches']).set_index('pivot')
    df.attrs.update(prime=data['prime'], matrix_sha=data['matrix_sha'],
                    smooth=data['smooth'])
    return df
