#!/usr/bin/env python3
"""
Quick Setup Script
Installs the numeric stack and runs a smoke computation
"""

import os
import subprocess
import sys

REQUIREMENTS = "requirements.txt"
SMOKE_CONFIG = os.path.join("samples", "classical_k4.json")


def check_python_version():
    """Check if Python version is compatible."""
    if sys.version_info < (3, 9):
        print("ERROR: Python 3.9 or higher is required")
        print(f"Current version: {sys.version}")
        return False
    print(f"✓ Python version: {sys.version.split()[0]}")
    return True


def install_dependencies():
    """Install numpy, sympy, mpmath and pytest from requirements.txt."""
    print("\n" + "=" * 60)
    print("Installing dependencies...")
    print("=" * 60)

    with open(REQUIREMENTS, 'r', encoding='utf-8') as f:
        packages = [line.strip() for line in f if line.strip() and not line.startswith('#')]

    for package in packages:
        try:
            print(f"Installing {package}...")
            subprocess.check_call([sys.executable, "-m", "pip", "install", package, "-q"])
            print(f"✓ {package} installed")
        except subprocess.CalledProcessError:
            print(f"⚠ Could not install {package}")
            print(f"  You may need to install manually: pip install {package}")


def smoke_test():
    """Compute the weight-4 classical series and compare with 240·σ_3."""
    print("\n" + "=" * 60)
    print("Running smoke computation...")
    print("=" * 60)

    try:
        from data_loader import load_config
        from eisenstein_engine import EisensteinSpec, fourier_table

        config = load_config(SMOKE_CONFIG)
        spec = EisensteinSpec(config.lattice_obj, config.beta_element, config.weight, form=config.form)
        table = fourier_table(spec, 2, "exact")
        value = table.get(config.form.zero(), 1)
        print(f"\nCoefficient of q in E_4 (normalised to constant term 2): {value.rational_value()}")
        if value != 480:
            print("ERROR: expected 480")
            return False
        print("\n✓ Exact arithmetic is working!")
        return True

    except Exception as e:
        print(f"ERROR running smoke computation: {e}")
        return False


def print_next_steps():
    """Print next steps for the user."""
    print("\n" + "=" * 60)
    print("SETUP COMPLETE!")
    print("=" * 60)
    print("\nYou can now run:\n")

    print("1. Compute a table:")
    print("   python eisenstein_cli.py compute --config samples/rank_one_k7_2.json")

    print("\n2. Run property suites:")
    print("   python eisenstein_cli.py verify --config samples/hyperbolic_3_k5.json --suite gsums")

    print("\n3. Review past runs:")
    print("   python eisenstein_cli.py analytics")

    print("\n4. Test suite:")
    print("   pytest -m 'not slow'")

    print("\n" + "=" * 60)
    print("For more information, see README.md")
    print("=" * 60 + "\n")


def main():
    """Main setup process."""
    print("\n" + "=" * 60)
    print("EISENSTEIN TOOLKIT - SETUP WIZARD")
    print("=" * 60)

    if not check_python_version():
        return

    choice = input("\nInstall dependencies from requirements.txt? (Y/n): ").lower()
    if choice != 'n':
        install_dependencies()

    if smoke_test():
        print_next_steps()
    else:
        print("\n⚠ Smoke computation failed. Please check the error messages above.")


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        print("\n\nSetup interrupted by user.")
