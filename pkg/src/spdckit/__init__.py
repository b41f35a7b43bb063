"""Design and characterisation tools for thin-crystal, fiber-coupled SPDC sources."""

__version__ = "0.1.0"
