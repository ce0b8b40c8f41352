import polyhdiv.geometry
import polyhdiv.polyspace
import polyhdiv.poisson
import polyhdiv.hkspace
import polyhdiv.dofs
import polyhdiv.element
import polyhdiv.rtref
import polyhdiv.verify

__version__ = "0.1.0"
