#!/usr/bin/env python3
"""
Quick Demo - Eisenstein toolkit
Walks through the sample lattices in samples/
"""

import os
from fractions import Fraction

from data_loader import describe_lattice, load_config
from eisenstein_engine import EisensteinSpec, fourier_table, oldform_decompose, untwisted_series
from exact_arith import characters_mod, format_fraction
from hecke import admissible_primes, eigenvalue, verify_eigenform
from logger import RunLogger


def load_sample(name):
    """Load one of the bundled job configurations."""
    return load_config(os.path.join("samples", name))


def show_table(table, limit=8):
    for record in table.records()[:limit]:
        value = record["value"]
        shown = value["coeffs"] if "coeffs" in value else f"{value['re']} + {value['im']}i"
        print(f"  γ = {record['gamma']}, n = {record['n']}: {shown}")


def demo_classical():
    """The rank-0 lattice gives back the classical Eisenstein series."""
    print("\n" + "=" * 70)
    print(" CLASSICAL EISENSTEIN SERIES")
    print("=" * 70)

    config = load_sample("classical_k4.json")
    spec = EisensteinSpec(config.lattice_obj, config.beta_element, config.weight, form=config.form)
    print(f"\n📐 {describe_lattice(config.lattice)}, k = {format_fraction(config.weight)}")
    table = fourier_table(spec, config.n_max, "exact")
    show_table(table)
    print("\n✓ Coefficients are 480·σ_3(n), twice the usual normalisation")


def demo_rank_one():
    """Half-integral weight on the lattice Z with Q(x) = x²."""
    print("\n" + "=" * 70)
    print(" RANK ONE, WEIGHT 7/2")
    print("=" * 70)

    config = load_sample("rank_one_k7_2.json")
    spec = EisensteinSpec(config.lattice_obj, config.beta_element, config.weight, form=config.form)
    print(f"\n📐 {describe_lattice(config.lattice)}, κ = {spec.kappa}")
    table = fourier_table(spec, config.n_max, "exact")
    show_table(table)

    odd = EisensteinSpec(config.lattice_obj, config.beta_element, Fraction(5, 2), form=config.form)
    print(f"\nAt k = 5/2: {odd.vanishing_reason()}")


def demo_twisted():
    """Every character mod N_β, and their average E_{A,β}."""
    print("\n" + "=" * 70)
    print(" TWISTED SERIES ON U(3)")
    print("=" * 70)

    config = load_sample("hyperbolic_3_k5.json")
    n_max = Fraction(1)
    tables = {}
    for chi in characters_mod(config.form.order_of(config.beta_element)):
        spec = EisensteinSpec(config.lattice_obj, config.beta_element, config.weight, chi, config.form)
        tables[chi.label] = fourier_table(spec, n_max, "auto")
        state = spec.vanishing_reason() or f"{len(tables[chi.label].records())} non-zero coefficients"
        print(f"\n  χ = {chi.label}: {state}")

    untwisted = untwisted_series(config.lattice_obj, config.beta_element, config.weight, n_max,
                                 form=config.form, tables=tables)
    print("\n📊 E_A,β (rational):")
    show_table(untwisted, limit=6)


def demo_hecke():
    """Twisted series are Hecke eigenforms with eigenvalue χ(r) + p^{k-1}χ̄(r)."""
    print("\n" + "=" * 70)
    print(" HECKE EIGENVALUES")
    print("=" * 70)

    config = load_sample("rank_one_k7_2.json")
    spec = EisensteinSpec(config.lattice_obj, config.beta_element, config.weight, form=config.form)
    for h in admissible_primes(config.lattice_obj, 1):
        lam = eigenvalue(spec.character, h, spec.weight)
        source = fourier_table(spec, h.p ** 2, "exact")
        ok, deviation = verify_eigenform(source, h, lam, 1)
        status = "✓" if ok else "✗"
        print(f"\n  {status} {h.label}: λ = {lam.rational_value()}, max deviation {deviation}")


def demo_oldforms():
    """An imprimitive character splits into lifts from smaller discriminant forms."""
    print("\n" + "=" * 70)
    print(" OLDFORM DECOMPOSITION")
    print("=" * 70)

    config = load_sample("split_two_k4.json")
    for chi in config.characters():
        spec = EisensteinSpec(config.lattice_obj, config.beta_element, config.weight, chi, config.form)
        print(f"\n  χ = {chi.label} (primitive: {chi.is_primitive()})")
        for term in oldform_decompose(spec):
            order = term.quotient.form.order if term.quotient else config.form.order
            print(f"    d = {term.d}: sign {term.sign.rational_value()}, |B_d| = {order}")


def demo_analytics():
    """Show the run log written by the command-line interface."""
    print("\n" + "=" * 70)
    print(" RUN ANALYTICS")
    print("=" * 70)
    RunLogger().print_analytics()


def main():
    """Main demo menu."""
    print("\n" + "=" * 70)
    print("Welcome to the Eisenstein toolkit demo!")
    print("\nThis demo computes exact Fourier coefficients for the sample lattices.")

    print("\n📋 Demo Options:")
    print("  1. Classical Eisenstein series")
    print("  2. Rank one, half-integral weight")
    print("  3. Twisted series and the untwisted average")
    print("  4. Hecke eigenvalues")
    print("  5. Oldform decomposition")
    print("  6. Run analytics")
    print("  7. Run All Demos")
    print("  q. Quit")

    choice = input("\nSelect option (1-7 or q): ").strip()

    demos = {'1': demo_classical, '2': demo_rank_one, '3': demo_twisted, '4': demo_hecke,
             '5': demo_oldforms, '6': demo_analytics}
    if choice in demos:
        demos[choice]()
    elif choice == '7':
        for key in sorted(demos):
            demos[key]()
    elif choice.lower() == 'q':
        print("\nGoodbye! 👋\n")
    else:
        print("\nInvalid option!")

    print("\n" + "=" * 70)
    print("For full tables with caching and verification, run:")
    print("  python eisenstein_cli.py compute --config samples/rank_one_k7_2.json")
    print("=" * 70 + "\n")


if __name__ == "__main__":
    main()
