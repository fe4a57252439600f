"""Packaged experiment configs, loadable by name through the CLI."""
