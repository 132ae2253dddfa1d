"""Hamilton cycle powers and tight Hamilton cycles in random (hyper)graphs.

The package is organized around the stages of the absorbing construction:

- :mod:`hampow.core` -- uniform hypergraphs, path templates, certificates
- :mod:`hampow.density` -- exact 1-density and rooted density computations
- :mod:`hampow.randmodels` -- seeded binomial random (hyper)graph generators
- :mod:`hampow.janson` -- lower-tail bound parameters for copy counts
- :mod:`hampow.matcher` -- rooted copy search and greedy connection rounds
- :mod:`hampow.factor` -- almost-factors from greedy window search
- :mod:`hampow.absorber` -- backbone gadgets and chained absorbers
- :mod:`hampow.pipeline` -- the end-to-end cycle finder
- :mod:`hampow.cli` -- command line front end
"""

from hampow.core import (
    CycleCertificate,
    Hypergraph,
    VertexTuple,
    connecting_path_template,
    power_path_template,
    tight_path_template,
    verify_certificate,
)
from hampow.pipeline import Parameters, find_hamilton

__all__ = [
    "CycleCertificate",
    "Hypergraph",
    "Parameters",
    "VertexTuple",
    "connecting_path_template",
    "find_hamilton",
    "power_path_template",
    "tight_path_template",
    "verify_certificate",
]

__version__ = "0.1.0"
