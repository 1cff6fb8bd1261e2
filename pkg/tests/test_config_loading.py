# tests/test_config_loading.py
# Unit test to ensure the config.yaml file loads correctly and has required sections.

import unittest
import yaml

class TestConfigYAML(unittest.TestCase):
    def test_config_yaml_valid(self):
        """
        Ensures that config.yaml is present, can be loaded, and contains required top-level keys.
        """
        try:
            with open("config.yaml", "r", encoding="utf-8") as f:
                config = yaml.safe_load(f) # Load the YAML configuration from config.yaml.

            # Check for top-level sections expected in the configuration
            for section in ("budgets", "run", "selftest", "logging"):
                self.assertIn(section, config, f"Missing '{section}' section in config.yaml")

            # Budgets must be positive integers
            for name, value in config["budgets"].items():
                self.assertIsInstance(value, int, f"budgets.{name} must be an integer")
                self.assertGreater(value, 0, f"budgets.{name} must be positive")

        except FileNotFoundError:
            self.fail("config.yaml not found. Make sure it exists at the root level.") # Fail the test if config.yaml is not found.
        except yaml.YAMLError as e:
            self.fail(f"config.yaml contains invalid YAML: {e}") # Fail the test if config.yaml contains invalid YAML.

if __name__ == "__main__":
    unittest.main() # Run the unit tests.
