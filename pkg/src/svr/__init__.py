"""A call-by-value λμ-calculus with an abstract machine, an observational
equivalence procedure and a type checker with a semantical value restriction."""

__version__ = "0.1.0"
