"""Print the scenario-file schema (keys, types, defaults, units) as a Markdown table."""
from stockfire.scenario_io import schema_table

if __name__ == "__main__":
    print(schema_table())
