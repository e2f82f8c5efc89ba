"""SenTag: collaborative text annotation with XML output, schema validation,
agreement scoring, and argument graphs."""

__version__ = "0.1.0"
