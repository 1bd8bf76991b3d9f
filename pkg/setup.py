# Packaging for WAND.
#
# The test suite is a set of plain unittest scripts driven by
# test/run-test.sh; ``python setup.py check_tests`` runs it against the
# source tree.
from setuptools import Command, find_packages, setup
import os
import subprocess
import sys

root_dir = os.path.abspath(os.path.dirname(__file__))


def load_version():
    import re
    from contextlib import closing
    with closing(open(os.path.join(root_dir, "wand", "_version.py"),
                      "r")) as f:
        for line in f:
            # line:
            # version = (0, 3, 0)
            match = re.match(r"version\s*=\s*\((\d+),\s*(\d+),\s*(\d+)\)",
                             line.strip())
            if match is not None:
                return ".".join(match.groups())
    raise RuntimeError("no version tuple in wand/_version.py")


class check_tests(Command):
    description = "run test/run-test.sh against the source tree"
    user_options = [("slow", None, "also run the long statistical tests")]

    def initialize_options(self):
        self.slow = False

    def finalize_options(self):
        pass

    def run(self):
        env = dict(os.environ, PYTHON=sys.executable,
                   WAND_TOP_SRCDIR=root_dir)
        if self.slow:
            env["WAND_SLOW_TESTS"] = "1"
        status = subprocess.call(
            ["/bin/bash", os.path.join(root_dir, "test", "run-test.sh")],
            env=env)
        # 77 means some scripts were skipped, which is not a failure
        if status not in (0, 77):
            raise SystemExit(status)


setup(
    name='wand',
    version=load_version(),
    description="Clustering rankers with an infinite mixture of weighted "
                "Plackett-Luce models",
    license="MIT",
    packages=find_packages(exclude=["test", "tools"]),
    python_requires=">=3.7",
    install_requires=["numpy>=1.17", "scipy>=1.4", "tqdm>=4.0"],
    zip_safe=False,
    entry_points={"console_scripts": ["wand = wand.cli:main"]},
    cmdclass={'check_tests': check_tests}
)
