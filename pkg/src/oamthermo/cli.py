"""Command-line driver: calibrate -> simulate -> reconstruct -> analyse.

Each subcommand recomputes whatever it needs upstream from the config, so
any one of them can run on its own; ``pipeline`` runs them all in order.
Exit status: 0 success, 2 configuration error, 3 numerical failure (files
written before the failure are kept).
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

from . import optics, process, reconstruct, stats
from .config import ConfigError, ExperimentConfig, load_config
from .oscillator import thermal_distribution

log = logging.getLogger("oamthermo")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SUBCOMMANDS = ("calibrate", "simulate", "reconstruct", "work-stats", "demon", "mc-band", "pipeline")


class NumericalFailure(RuntimeError):
    pass


class Run:
    """Lazily computed pipeline stages for one configuration."""

    def __init__(self, config, out_dir):
        self.config = config
        self.out_dir = out_dir
        self._cache = {}

    def _once(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def write(self, name, text):
        os.makedirs(self.out_dir, exist_ok=True)
        path = os.path.join(self.out_dir, name)
        with open(path, "w", newline="") as f:
            f.write(text)
        log.info("wrote %s", path)

    @property
    def calib(self):
        return self._once("calib", lambda: optics.calibration_profiles(self.config.geometry))

    @property
    def kernel(self):
        return self._once(
            "kernel", lambda: process.build_kernel(self.config.process, self.config.input_range)
        )

    @property
    def observations(self):
        c = self.config
        return self._once(
            "obs", lambda: optics.simulate_observations(self.kernel, self.calib, c.noise, c.seed)
        )

    @property
    def fit(self):
        c = self.config

        def run():
            rep = reconstruct.fit_transition_matrix(
                self.calib, self.observations, tol=c.tol, max_iter=c.max_iter
            )
            self.write("kernel.csv", rep.kernel.to_csv())
            self.write("fit_report.json", rep.to_json())
            if not rep.converged:
                raise NumericalFailure(
                    f"reconstruction did not converge in {c.max_iter} iterations"
                )
            return rep

        return self._once("fit", run)


def cmd_calibrate(run):
    run.write("calibration.csv", run.calib.to_csv())


def cmd_simulate(run):
    run.write("true_kernel.csv", run.kernel.to_csv())
    run.write("observations.csv", run.observations.to_csv())


def cmd_reconstruct(run):
    rep = run.fit
    log.info("residual %.3g after %d iterations", rep.residual, rep.iterations)


def cmd_work_stats(run):
    c = run.config
    grid = c.beta_grid.values()
    fitted = run.fit.kernel
    dist = stats.work_distribution(thermal_distribution(c.work_beta, c.cutoff), fitted)
    run.write("work_distribution.csv", dist.to_csv())
    df = c.process.delta_F
    run.write("curve.csv", stats.curve_to_csv(stats.fluctuation_curve(fitted, c.cutoff, grid, df)))
    run.write(
        "curve_theory.csv",
        stats.curve_to_csv(stats.fluctuation_curve(run.kernel, c.cutoff, grid, df)),
    )
    log.info("<W> = %.4f at beta_hw = %g", stats.mean_work(dist), c.work_beta)


def cmd_demon(run):
    c = run.config
    grid = c.beta_grid.values()
    ideal = process.demon_kernel(c.process.demon_shift, c.input_range)
    obs = optics.simulate_observations(ideal, run.calib, c.noise, c.seed)
    rep = reconstruct.fit_transition_matrix(run.calib, obs, tol=c.tol, max_iter=c.max_iter)
    run.write(
        "demon_curve_theory.csv",
        stats.curve_to_csv(stats.fluctuation_curve(ideal, c.cutoff, grid, c.process.delta_F)),
    )
    if not rep.converged:
        raise NumericalFailure("demon reconstruction did not converge")
    run.write(
        "demon_curve.csv",
        stats.curve_to_csv(stats.fluctuation_curve(rep.kernel, c.cutoff, grid, c.process.delta_F)),
    )


def cmd_mc_band(run):
    c = run.config
    band = stats.monte_carlo_band(
        run.kernel,
        geometry=c.geometry,
        noise=c.noise,
        cutoff=c.cutoff,
        beta_grid=c.beta_grid.values(),
        trials=c.trials,
        seed=c.seed,
        delta_F=c.process.delta_F,
        tol=c.tol,
        max_iter=c.max_iter,
    )
    run.write("band.csv", band.to_csv())
    run.write("band.json", band.to_json())
    if band.excluded:
        log.warning("%d of %d trials did not converge", band.excluded, c.trials)


COMMANDS = {
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "work-stats": cmd_work_stats,
    "demon": cmd_demon,
    "mc-band": cmd_mc_band,
}


def run_subcommand(name, config, out_dir=None):
    """Run one subcommand (or ``pipeline``) and return the exit status."""
    run = Run(config, out_dir or config.outputs)
    names = list(COMMANDS) if name == "pipeline" else [name]
    try:
        for n in names:
            log.info("running %s", n)
            COMMANDS[n](run)
    except NumericalFailure as e:
        log.error("%s", e)
        return EXIT_NUMERIC
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="oamthermo", description="OAM quantum-thermodynamics experiment simulator"
    )
    p.add_argument("command", choices=SUBCOMMANDS)
    p.add_argument("--config", help="JSON experiment configuration (defaults if omitted)")
    p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    p.add_argument("--out", help="output directory (overrides config 'outputs')")
    p.add_argument("--quiet", action="store_true", help="only report warnings and errors")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        config = load_config(args.config) if args.config else ExperimentConfig()
        if args.seed is not None:
            config = replace(config, seed=args.seed)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return run_subcommand(args.command, config, args.out)


if __name__ == "__main__":
    sys.exit(main())
