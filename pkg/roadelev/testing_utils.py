# coding=utf-8
# Copyright (c) 2022, roadelev developers.  All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Test helpers: skip decorators, seeding, array assertions, output capture and subprocess runs."""

import asyncio
import contextlib
import inspect
import logging
import os
import random
import re
import shutil
import sys
import tempfile
import unittest
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np

try:
    import torch
    _torch_available = True
except ImportError:
    _torch_available = False

REPO_ROOT = Path(__file__).resolve().parents[1]


def is_torch_available():
    return _torch_available


def parse_flag_from_env(key, default=False):
    value = os.environ.get(key)
    if value is None:
        return default
    value = value.lower()
    if value in {"y", "yes", "t", "true", "on", "1"}:
        return True
    if value in {"n", "no", "f", "false", "off", "0"}:
        return False
    raise ValueError(f"If set, {key} must be yes or no.")


_run_slow_tests = parse_flag_from_env("RUN_SLOW", default=False)


def slow(test_case):
    """Skip ``test_case`` unless RUN_SLOW is set to a truthy value."""
    return test_case if _run_slow_tests else unittest.skip("test is slow")(test_case)


def require_torch(test_case):
    """Skip ``test_case`` when PyTorch isn't installed."""
    return test_case if is_torch_available() else unittest.skip("test requires PyTorch")(test_case)


def set_seed(seed: int = 42):
    """Seed ``random``, ``numpy`` and, when available, ``torch``."""
    random.seed(seed)
    np.random.seed(seed)
    if is_torch_available():
        torch.manual_seed(seed)


def np_assert_close(actual, expected, atol=1e-6, rtol=0.0, msg=""):
    np.testing.assert_allclose(np.asarray(actual, dtype=np.float64), np.asarray(expected, dtype=np.float64),
                               atol=atol, rtol=rtol, err_msg=msg)


def np_assert_equal(actual, expected, msg=""):
    np.testing.assert_array_equal(actual, expected, err_msg=msg)


def get_tests_dir(append_path=None):
    """Directory of the calling test file, optionally joined with ``append_path``."""
    tests_dir = os.path.abspath(os.path.dirname(inspect.stack()[1][1]))
    return os.path.join(tests_dir, append_path) if append_path else tests_dir


class CaptureStd:
    """Capture stdout and/or stderr into ``out`` / ``err``, replaying them on exit.

    Example::

        with CaptureStd() as cs:
            main(["bench-vt", "--repetitions", "1"])
        report = json.loads(cs.out)
    """

    def __init__(self, out=True, err=True, replay=True):
        self.replay = replay
        self.out_buf = StringIO() if out else None
        self.err_buf = StringIO() if err else None
        self.out = "not capturing stdout" if not out else ""
        self.err = "not capturing stderr" if not err else ""

    def __enter__(self):
        if self.out_buf:
            self.out_old, sys.stdout = sys.stdout, self.out_buf
        if self.err_buf:
            self.err_old, sys.stderr = sys.stderr, self.err_buf
        return self

    def __exit__(self, *exc):
        if self.out_buf:
            sys.stdout = self.out_old
            captured = self.out_buf.getvalue()
            if self.replay:
                sys.stdout.write(captured)
            # drop lines overwritten through carriage returns
            self.out = re.sub(r"^.*\r", "", captured, 0, re.M)
        if self.err_buf:
            sys.stderr = self.err_old
            self.err = self.err_buf.getvalue()
            if self.replay:
                sys.stderr.write(self.err)


class CaptureStdout(CaptureStd):
    def __init__(self, replay=True):
        super().__init__(err=False, replay=replay)


class CaptureStderr(CaptureStd):
    def __init__(self, replay=True):
        super().__init__(out=False, replay=replay)


class CaptureLogger:
    """Collect what ``logger`` emits inside the block into ``out``.

    Example::

        with CaptureLogger(logging.get_logger("roadelev.supervision.evaluation")) as cl:
            metrics(pred, gt)
        assert "share no valid cell" in cl.out
    """

    def __init__(self, logger):
        self.logger = logger
        self.io = StringIO()
        self.sh = logging.StreamHandler(self.io)
        self.out = ""

    def __enter__(self):
        self.logger.addHandler(self.sh)
        return self

    def __exit__(self, *exc):
        self.logger.removeHandler(self.sh)
        self.out = self.io.getvalue()


@contextlib.contextmanager
def mockenv_context(*remove, **update):
    """Set ``update`` and unset ``remove`` in ``os.environ`` for the duration of the block."""
    with mock.patch.dict(os.environ, update):
        for key in remove:
            os.environ.pop(key, None)
        yield


class TestCasePlus(unittest.TestCase):
    """``unittest.TestCase`` with auto-removed temporary directories and a subprocess environment.

    ``get_auto_remove_tmp_dir()`` returns a fresh directory deleted in ``tearDown``; ``get_env()`` returns a copy of
    ``os.environ`` whose ``PYTHONPATH`` starts at the repository root so ``python -m roadelev`` resolves to this
    checkout.
    """

    def setUp(self):
        self.teardown_tmp_dirs = []

    def get_env(self):
        env = os.environ.copy()
        env["PYTHONPATH"] = os.pathsep.join(p for p in (str(REPO_ROOT), env.get("PYTHONPATH", "")) if p)
        return env

    def get_auto_remove_tmp_dir(self):
        tmp_dir = tempfile.mkdtemp(prefix="roadelev-")
        self.teardown_tmp_dirs.append(tmp_dir)
        return tmp_dir

    def tearDown(self):
        for path in self.teardown_tmp_dirs:
            shutil.rmtree(path, ignore_errors=True)
        self.teardown_tmp_dirs = []


class _RunOutput:
    def __init__(self, returncode, stdout, stderr):
        self.returncode = returncode
        self.stdout = stdout
        self.stderr = stderr


async def _collect(stream, sink, pipe, label, quiet):
    while True:
        line = await stream.readline()
        if not line:
            break
        line = line.decode("utf-8").rstrip()
        sink.append(line)
        if not quiet:
            print(label, line, file=pipe)


async def _stream_subprocess(cmd, env=None, stdin=None, timeout=None, quiet=False, echo=False):
    if echo:
        print("\nRunning: ", " ".join(cmd))
    p = await asyncio.create_subprocess_exec(cmd[0], *cmd[1:], stdin=stdin, stdout=asyncio.subprocess.PIPE,
                                             stderr=asyncio.subprocess.PIPE, env=env)
    out, err = [], []
    await asyncio.wait_for(asyncio.gather(_collect(p.stdout, out, sys.stdout, "stdout:", quiet),
                                          _collect(p.stderr, err, sys.stderr, "stderr:", quiet)), timeout)
    return _RunOutput(await p.wait(), out, err)


def execute_subprocess_async(cmd, env=None, stdin=None, timeout=180, quiet=False, echo=True, check=True):
    """Run ``cmd`` streaming its output; with ``check`` a non-zero return code raises ``RuntimeError``."""
    result = asyncio.run(_stream_subprocess(cmd, env=env, stdin=stdin, timeout=timeout, quiet=quiet, echo=echo))
    if check and result.returncode > 0:
        stderr = "\n".join(result.stderr)
        raise RuntimeError(f"'{' '.join(cmd)}' failed with returncode {result.returncode}\n\n"
                           f"The combined stderr follows:\n{stderr}")
    return result
