#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/

import os, json, pathlib
import numpy as np
from concurrent.futures import ThreadPoolExecutor
from tqdm import tqdm

# ****** environment ******

def debug_level():
  try: return int(os.getenv("DEBUG", "0"))
  except ValueError: return 1

def debug(msg, level=1):
  if debug_level() >= level: print(f"[polyhdiv] {msg}")

def warn(msg):
  if os.getenv("QUIET") != "1": print(f"warning, {msg}")

def progress(iterable, desc=None, total=None):
  # bars only when someone asked for output and we are not on CI
  disable = os.getenv("CI") is not None or debug_level() == 0
  return tqdm(iterable, desc=desc, total=total, disable=disable, leave=False)

def worker_count():
  try: n = int(os.getenv("POLYHDIV_THREADS", "1"))
  except ValueError: n = 1
  return max(1, n)

def parallel_map(fxn, items):
  items = list(items)
  if worker_count() == 1 or len(items) < 2: return [fxn(x) for x in items]
  with ThreadPoolExecutor(max_workers=worker_count()) as ex:
    return list(ex.map(fxn, items))

def frozen(a, dtype=np.float64):
  a = np.array(a, dtype=dtype)
  a.flags.writeable = False
  return a

# ****** structured documents ******

def load_document(path):
  with open(path, encoding="utf-8") as f: return json.load(f)

def to_jsonable(x):
  if isinstance(x, dict): return {str(k): to_jsonable(v) for k,v in x.items()}
  if isinstance(x, (list, tuple)): return [to_jsonable(v) for v in x]
  if isinstance(x, np.ndarray): return to_jsonable(x.tolist())
  if isinstance(x, (np.integer,)): return int(x)
  if isinstance(x, (np.floating,)): return float(x)
  if isinstance(x, (np.bool_,)): return bool(x)
  if isinstance(x, float) and not np.isfinite(x): return str(x)
  return x

def dump_document(obj, path):
  path = pathlib.Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  with open(path, "w", encoding="utf-8") as f:
    json.dump(to_jsonable(obj), f, indent=2, sort_keys=True)
    f.write("\n")
  return path

# ****** archives: json metadata + little endian float64 blobs ******

def write_archive(directory, meta, arrays):
  """
  writes meta.json plus one <name>.bin per array, shapes recorded in the metadata
  """
  directory = pathlib.Path(directory)
  directory.mkdir(parents=True, exist_ok=True)
  shapes = {}
  for name, arr in arrays.items():
    arr = np.ascontiguousarray(arr, dtype="<f8")
    arr.tofile(directory / f"{name}.bin")
    shapes[name] = list(arr.shape)
  dump_document(dict(meta, arrays=shapes), directory / "meta.json")
  return directory

def read_archive(directory):
  directory = pathlib.Path(directory)
  meta = load_document(directory / "meta.json")
  arrays = {}
  for name, shape in meta.get("arrays", {}).items():
    arrays[name] = np.fromfile(directory / f"{name}.bin", dtype="<f8").reshape(shape)
  return meta, arrays

def write_csv(path, header, rows):
  path = pathlib.Path(path)
  path.parent.mkdir(parents=True, exist_ok=True)
  with open(path, "w", encoding="utf-8", newline="\n") as f:
    f.write(",".join(header) + "\n")
    for row in rows:
      f.write(",".join(str(v) if isinstance(v, (int, np.integer)) else repr(float(v)) for v in row) + "\n")
  return path
