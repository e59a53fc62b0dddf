"""Command-line front end: experiment configs, sweep execution, report emission."""
