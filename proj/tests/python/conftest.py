import os
import sys

# In-tree runs: the CMake-built extension and the package sources are not
# installed, so put both on the path from the environment the test runner sets.
module_dir = os.environ.get("LENSCATTER_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

src = os.environ.get("LENSCATTER_SRC")
if src:
    sys.path.insert(0, os.path.join(src, "python"))
