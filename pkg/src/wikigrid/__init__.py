"""Wikipedia, Wikidata and pageviews lookups as composable table functions.

The package is organized in layers:

- ``core``: qualified titles (``en:Berlin``) and the shared error taxonomy.
- ``transport``: the only module that performs HTTP; supports record/replay
  against an on-disk fixture archive, rate limiting and an in-run cache.
- ``mediawiki`` / ``wikidata`` / ``pageviews``: typed clients for the three
  upstream APIs.
- ``functions``: the twelve ``WIKI*`` table functions built on the clients.
- ``formula`` / ``grid``: a spreadsheet formula parser and grid evaluator
  with the twelve functions as builtins.
- ``scenarios``: multi-step recipes (category panel, search ads, campaign).
- ``service`` / ``cli``: a FastAPI front end and a thin command-line client.
"""

__version__ = "0.1.0"

from wikigrid.core import ErrorKind, QualifiedTitle, ToolkitError, parse_qualified

__all__ = [
    "ErrorKind",
    "QualifiedTitle",
    "ToolkitError",
    "parse_qualified",
    "__version__",
]
