"""storyloom: turn node-based storyboards into multi-chapter stories."""

__version__ = "0.1.0"
