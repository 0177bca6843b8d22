"""
Reproduction bundle from the command line
=========================================

The same pipeline is available as ``capdemand fit | welfare | report``.
This script drives it in-process and lists what ``report`` writes.
"""

import os
import tempfile

from capdemand.cli import main

main(["fit", "--window", "2012:2019"])
main(["welfare", "--scenario", "23:15", "--scenario", "15:14", "--precision", "paper_rounded"])

with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "bundle")
    main(["report", "--out", out, "--format", "json"])
    for name in sorted(os.listdir(out)):
        print(name, os.path.getsize(os.path.join(out, name)), "bytes")
