"""Packaged data files: golden X-ladder adjacency lists and recursive family specs."""
