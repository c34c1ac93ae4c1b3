import os
import sys

# ctest points this at the build tree so an older installed copy is not picked up
_stage = os.environ.get("NLD_PYTHON_STAGE")
if _stage:
    sys.meta_path[:] = [f for f in sys.meta_path if "ScikitBuild" not in type(f).__name__]
    sys.path.insert(0, _stage)
    for name in [m for m in sys.modules if m.split(".")[0] == "nonlocal_dirichlet"]:
        del sys.modules[name]
