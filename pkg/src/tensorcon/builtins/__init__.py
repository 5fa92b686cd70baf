"""tensorcon.builtins - Default implementations for tensorcon declarations."""
