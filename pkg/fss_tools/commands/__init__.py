import logging

logging.basicConfig(level=logging.INFO)
log = logging.getLogger()


from fss_tools.commands.check import sweep, verify
from fss_tools.commands.solve import solve, solve_system
from fss_tools.commands.spec import coeffs, reduce_spec, roots

commands_registry = {
    "roots": roots,
    "coeffs": coeffs,
    "reduce": reduce_spec,
    "solve": solve,
    "solve-system": solve_system,
    "sweep": sweep,
    "verify": verify,
}
