"""Single-shot parity readout of qubit registers through a driven cavity and a photon counter."""

__version__ = "0.1.0"
