"""Link-level simulator for plug-in RIS assisted mmWave MIMO links."""

__version__ = "0.1.0"
