"""Exceptions, settings lookup and provenance shared by every app."""
