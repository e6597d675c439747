"""Build script for the optional compiled kernel.

The package is pure Python plus one optional Cython extension that
accelerates batch latency evaluation.  If Cython or a C compiler is
missing the extension is skipped and the numpy fallback is used at
import time.
"""

import os

from setuptools import Extension, setup

PYX = "src/ehdnas/perfmodel/_kernels_cy.pyx"

ext_modules = []
if os.path.exists(PYX):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("ehdnas.perfmodel._kernels_cy", [PYX], optional=True)],
            language_level=3,
        )

setup(ext_modules=ext_modules)
