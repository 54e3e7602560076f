import sys
from pathlib import Path

# make `import oracles` work regardless of pytest invocation directory
sys.path.insert(0, str(Path(__file__).resolve().parent))
