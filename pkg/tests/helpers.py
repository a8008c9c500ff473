from rtsearch.grid import parse_map

# (criterion number, line) pairs, printed in the terminal summary
ACCEPTANCE_REPORT = []


def grid_from_rows(*rows, map_id="fixture"):
    body = "\n".join(rows)
    return parse_map(f"type octile\nheight {len(rows)}\nwidth {len(rows[0])}\nmap\n{body}\n", map_id)
