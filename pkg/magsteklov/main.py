import logging

from targ import CLI

from magsteklov.harness.commands import (
    bessel,
    bstar,
    bstar_exterior,
    disk,
    exterior_disk,
    fiber,
    kappa,
    run,
    steklov,
    torsion,
    trial,
    verify_bounded,
    verify_exterior,
)


COMMANDS = (
    (disk, []),
    (fiber, []),
    (bstar, []),
    (torsion, []),
    (kappa, []),
    (steklov, []),
    (exterior_disk, ["exterior-disk"]),
    (trial, []),
    (bstar_exterior, ["bstar-exterior"]),
    (bessel, []),
    (verify_bounded, ["verify-bounded"]),
    (verify_exterior, ["verify-exterior"]),
    (run, []),
)


def main():
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    cli = CLI(description="Magnetic Steklov eigenvalue toolkit")
    for command, aliases in COMMANDS:
        cli.register(command, aliases=aliases)
    cli.run()


if __name__ == "__main__":
    main()
