import argparse
import logging
import sys
from src import Bianchi


def parse_args(argv=None) -> argparse.Namespace:
  parser = argparse.ArgumentParser(
    prog="bianchi",
    description="Decide formality of sphere bundles from the cohomology ring of the base.",
  )
  parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress (-v) or linear algebra sizes (-vv)")
  commands = parser.add_subparsers(dest="command", required=True)

  check = commands.add_parser("check", help="validate an algebra file and its Poincare duality")
  check.add_argument("path")

  show = commands.add_parser("show", help="re-serialize an algebra file")
  show.add_argument("path")

  formality = commands.add_parser("formality", help="decide formality of a sphere bundle")
  formality.add_argument("path")
  formality.add_argument("--sphere-dim", type=int, required=True)
  formality.add_argument("--euler", help="Euler class as a combination such as '2*x2 - a'")
  formality.add_argument("--base-formal", action="store_true", help="attest that the base manifold is formal")
  formality.add_argument("--all-degrees", action="store_true", help="evaluate the tensor in every degree")
  formality.add_argument("--certificate", help="write the A-infinity certificate to this path")
  formality.add_argument("--seed", type=int, default=0)
  formality.add_argument("--trials", type=int, default=0, help="randomized choices for the independence check")

  tensor = commands.add_parser("bm-tensor", help="print the Bianchi-Massey tensor")
  tensor.add_argument("path")
  tensor.add_argument("--sphere-dim", type=int, required=True)
  tensor.add_argument("--euler", required=True)
  tensor.add_argument("--all-degrees", action="store_true")
  tensor.add_argument("--trials", type=int, default=0)
  tensor.add_argument("--seed", type=int, default=0)

  utm = commands.add_parser("utm", help="classify the unit tangent bundle")
  utm.add_argument("path")

  hl = commands.add_parser("hl", help="reducible Euler class obstruction")
  hl.add_argument("path")
  hl.add_argument("--omega", required=True)
  hl.add_argument("--r", type=int, required=True)
  hl.add_argument("--decomposition", help="pairs of basis names such as 'a:b, c:d'")

  lefschetz = commands.add_parser("lefschetz", help="hard Lefschetz table for a degree-2 class")
  lefschetz.add_argument("path")
  lefschetz.add_argument("--omega", required=True)
  lefschetz.add_argument("--boothby-wang", action="store_true", help="also run the circle bundle obstruction")

  verify = commands.add_parser("certify-verify", help="re-check a serialized certificate")
  verify.add_argument("path")
  return parser.parse_args(argv)


def main():
  args = parse_args()
  level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
  logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(message)s")

  kwargs = {"path": args.path}
  if args.command == "formality":
    kwargs.update(
      sphere_dim=args.sphere_dim, euler=args.euler, base_formal=args.base_formal,
      all_degrees=args.all_degrees, certificate=args.certificate, seed=args.seed, trials=args.trials,
    )
  elif args.command == "bm-tensor":
    kwargs.update(
      sphere_dim=args.sphere_dim, euler=args.euler, all_degrees=args.all_degrees,
      trials=args.trials, seed=args.seed,
    )
  elif args.command == "hl":
    kwargs.update(omega=args.omega, r=args.r, decomposition=args.decomposition)
  elif args.command == "lefschetz":
    kwargs.update(omega=args.omega, boothby_wang_bundle=args.boothby_wang)
  sys.exit(Bianchi().run(args.command, **kwargs))


if __name__ == '__main__':
  main()
