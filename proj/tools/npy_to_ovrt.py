#!/usr/bin/env python3
# Copyright 2026 The coatseg Authors.
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

"""Converts NumPy .npy arrays to and from the OVRT tensor container."""

import argparse
import struct
import sys

import numpy as np

_MAGIC = b"OVRT"
_VERSION = 1
_DTYPES = {"f32": (0, np.dtype("<f4")),
           "f64": (1, np.dtype("<f8")),
           "u32": (2, np.dtype("<u4"))}
_BY_TAG = {tag: dt for tag, dt in _DTYPES.values()}


def encode(array, dtype):
  tag, np_dtype = _DTYPES[dtype]
  if not 1 <= array.ndim <= 4:
    raise ValueError(f"rank must be in [1, 4], got {array.ndim}")
  if dtype == "u32":
    if not np.all(np.isfinite(array)) or np.any(array != np.round(array)):
      raise ValueError("uint32 payload must be integral")
    if np.any(array < 0) or np.any(array > 0xFFFFFFFF):
      raise ValueError("uint32 payload out of range")
  header = _MAGIC + struct.pack("<HB", _VERSION, array.ndim)
  header += struct.pack(f"<{array.ndim}I", *array.shape)
  header += struct.pack("<B", tag)
  return header + np.ascontiguousarray(array, dtype=np_dtype).tobytes()


def decode(data):
  if data[:4] != _MAGIC:
    raise ValueError("bad magic")
  version, rank = struct.unpack_from("<HB", data, 4)
  if version != _VERSION:
    raise ValueError(f"unsupported version {version}")
  if not 1 <= rank <= 4:
    raise ValueError(f"bad rank {rank}")
  dims = struct.unpack_from(f"<{rank}I", data, 7)
  tag = data[7 + 4 * rank]
  if tag not in _BY_TAG:
    raise ValueError(f"bad dtype tag {tag}")
  np_dtype = _BY_TAG[tag]
  payload = data[8 + 4 * rank:]
  expected = int(np.prod(dims)) * np_dtype.itemsize
  if len(payload) != expected:
    raise ValueError(f"payload is {len(payload)} bytes, expected {expected}")
  return np.frombuffer(payload, dtype=np_dtype).reshape(dims)


def main(argv=None):
  parser = argparse.ArgumentParser(description=__doc__)
  parser.add_argument("input", help=".npy file (or .ovrt with --reverse)")
  parser.add_argument("output", help=".ovrt file (or .npy with --reverse)")
  parser.add_argument("--dtype", choices=sorted(_DTYPES), default="f32",
                      help="payload type of the OVRT file (default f32)")
  parser.add_argument("--reverse", action="store_true",
                      help="convert OVRT to .npy instead")
  args = parser.parse_args(argv)
  try:
    if args.reverse:
      with open(args.input, "rb") as f:
        np.save(args.output, decode(f.read()))
    else:
      data = encode(np.load(args.input, allow_pickle=False), args.dtype)
      with open(args.output, "wb") as f:
        f.write(data)
  except (OSError, ValueError) as e:
    print(f"error: {e}", file=sys.stderr)
    return 1
  return 0


if __name__ == "__main__":
  sys.exit(main())
