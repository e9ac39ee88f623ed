import sys
from pathlib import Path

# make the shared helpers (oracle_reference, trace_gen) importable
sys.path.insert(0, str(Path(__file__).parent))
