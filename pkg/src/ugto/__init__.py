"""Named entity extraction with uncommon words and the UGTO tagging scheme."""

__version__ = "0.1.0"
