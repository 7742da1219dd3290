"""
Self-describing binary containers for fields.

A container starts with one text line
    #freesurface-container v1 kind=<kind> config_hash=<hex> [key=value ...]
followed by one block per field: a text header line
    name=<name> rank=<rank> dims=<d1>x<d2>x... [t=<t>]
and prod(dims) little-endian float64 values.
"""
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from settings import CONTAINER_MAGIC
from utils.errors import ContainerError

__all__ = ['FieldBlock', 'Container', 'write_container', 'read_container']

_DTYPE = np.dtype('<f8')


@dataclass
class FieldBlock:
    name: str
    rank: int
    data: np.ndarray
    t: float = None


@dataclass
class Container:
    kind: str
    config_hash: str
    attributes: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)

    def __getitem__(self, name):
        for block in self.blocks:
            if block.name == name:
                return block
        raise KeyError(name)

    def names(self):
        return [b.name for b in self.blocks]


def _pairs(tokens, line_no):
    pairs = {}
    for token in tokens:
        if '=' not in token:
            msg = f'Malformed token {token!r} on line {line_no} of container header'
            raise ContainerError(msg)
        key, value = token.split('=', 1)
        pairs[key] = value
    return pairs


def write_container(path, kind, config_hash, blocks, **attributes):
    """
    Write field blocks to a container file.

    :param Path path: destination
    :param str kind: container kind, e.g. 'compatible-data' or 'snapshots'
    :param str config_hash: hex digest of the configuration that produced the fields
    :param list blocks: FieldBlock objects
    :param attributes: extra key=value pairs for the first line; values must not contain spaces
    :return Path:
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    extra = ''.join(f' {k}={v}' for k, v in attributes.items())
    with open(path, 'wb') as f:
        f.write(f'{CONTAINER_MAGIC} kind={kind} config_hash={config_hash}{extra}\n'.encode('ascii'))
        for block in blocks:
            data = np.ascontiguousarray(block.data, dtype=_DTYPE)
            dims = 'x'.join(str(d) for d in data.shape)
            t = '' if block.t is None else f' t={block.t!r}'
            f.write(f'name={block.name} rank={block.rank} dims={dims}{t}\n'.encode('ascii'))
            f.write(data.tobytes())
    return path


def read_container(path):
    """
    Read a container file.

    :param Path path:
    :return Container:
    :raises ContainerError: on a missing magic line, malformed headers or truncated data
    """
    raw = Path(path).read_bytes()
    end = raw.find(b'\n')
    first = raw[:end].decode('ascii', errors='replace') if end >= 0 else ''
    if end < 0 or not first.startswith(CONTAINER_MAGIC):
        msg = f'{path} is not a field container'
        raise ContainerError(msg)

    header = _pairs(first[len(CONTAINER_MAGIC):].split(), 1)
    try:
        container = Container(header.pop('kind'), header.pop('config_hash'), header)
    except KeyError as e:
        msg = f'Container header of {path} is missing {e.args[0]}'
        raise ContainerError(msg)

    pos = end + 1
    line_no = 1
    while pos < len(raw):
        line_no += 1
        end = raw.find(b'\n', pos)
        if end < 0:
            msg = f'Truncated block header in {path}'
            raise ContainerError(msg)
        meta = _pairs(raw[pos:end].decode('ascii', errors='replace').split(), line_no)
        try:
            dims = tuple(int(d) for d in meta['dims'].split('x'))
            name, rank = meta['name'], int(meta['rank'])
        except (KeyError, ValueError):
            msg = f'Malformed block header on line {line_no} of {path}'
            raise ContainerError(msg)
        count = int(np.prod(dims))
        start, stop = end + 1, end + 1 + count * _DTYPE.itemsize
        if stop > len(raw):
            msg = f'Block {name} in {path} is truncated'
            raise ContainerError(msg)
        data = np.frombuffer(raw[start:stop], dtype=_DTYPE).reshape(dims).astype(float)
        t = float(meta['t']) if 't' in meta else None
        container.blocks.append(FieldBlock(name, rank, data, t))
        pos = stop
    return container
