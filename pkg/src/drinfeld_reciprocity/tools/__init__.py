"""tool_* handlers: JSON params in, response envelope out."""
