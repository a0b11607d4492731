"""coachloop: coach-in-the-loop health coaching backend."""

__version__ = "0.1.0"
