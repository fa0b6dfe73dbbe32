"""Exact 0-1 integer linear programming by depth-first branch and bound."""
