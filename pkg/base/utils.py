import hashlib
import io
import os
import re
import tempfile

import filelock
from django.conf import settings
from django.core.management import call_command
from django.core.serializers import json


def md5(data) -> str:
    if isinstance(data, str):
        data = data.encode()
    return hashlib.md5(data).hexdigest()


def un_camel(name: str) -> str:
    """MismatchError -> mismatch_error"""
    return re.sub(r'(?<!^)(?=[A-Z])', '_', name).lower()


def to_json(o, **kwargs) -> str:
    """Stable JSON for reports and cache files; None values are kept."""
    data = dict(allow_nan=False, sort_keys=True, indent=4, ensure_ascii=False)
    data.update(kwargs)
    return json.DjangoJSONEncoder(**data).encode(o)


def lock(key: str, timeout=10):
    path = os.path.join(tempfile.gettempdir(), settings.BASE_DIR.strip(os.sep).replace(os.sep, '_'))
    os.makedirs(path, exist_ok=True)
    return filelock.FileLock(os.path.join(path, key + '.lock'), timeout=timeout)


def execute_command(command, *args, **options) -> str:
    """Runs a management command, given by name or module, and returns its stdout."""
    name = command if isinstance(command, str) else command.__name__.rsplit('.', 1)[-1]
    out = io.StringIO()
    call_command(name, *args, stdout=out, **options)
    return out.getvalue()
