import json
from pathlib import Path

__all__ = ['list_files_recur', 'get_all_data_files', 'read_hash_line', 'write_json', 'read_json']


def list_files_recur(path):
    """
    Cheater function that wraps path.rglob().

    :param Path path: path to list recursively
    :return list: sorted list of Path objects
    """
    return sorted(p for p in Path(path).rglob('*') if p.is_file())


def get_all_data_files(path, filetype):
    """
    Recursively search the given directory for .xxx files.

    :param Path path: Path to search
    :param str filetype: str, ".type" of file to search for
    :return list: list of file-like Path objects
    """
    return [file for file in list_files_recur(path) if file.name.endswith(filetype)]


def read_hash_line(path):
    """
    Config hash recorded on the first line of an output table, '# config_hash=<hex>'.

    :param Path path: CSV written by the reporting package
    :return str | None: the hash, or None when the first line carries none
    """
    with open(path) as f:
        first = f.readline().strip()
    if first.startswith('#') and 'config_hash=' in first:
        return first.split('config_hash=', 1)[1].split()[0]
    return None


def write_json(path, payload):
    """Write JSON with sorted keys so identical payloads give identical files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + '\n')
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def _json_default(obj):
    if hasattr(obj, 'item'):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f'Object of type {obj.__class__.__name__} is not JSON serializable')
