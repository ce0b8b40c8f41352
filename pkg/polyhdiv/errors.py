#  ____   ___  _  __   __ _   _ ____ _____     __
# |  _ \ / _ \| | \ \ / /| | | |  _ \_ _\ \   / /
# | |_) | | | | |  \ V / | |_| | | | | | \ \ / /
# |  __/| |_| | |___| |  |  _  | |_| | |  \ V /
# |_|    \___/|_____|_|  |_| |_|____/___|  \_/

class PolyhdivError(Exception):
  """
  root of every error raised by polyhdiv, carries a machine readable kind
  """
  @property
  def kind(self):
    return type(self).__name__

  def to_record(self):
    return {"kind": self.kind, "message": str(self)}

class GeometryError(PolyhdivError): pass      # bad polygon input
class MeshError(PolyhdivError): pass          # degenerate sub-mesh
class QuadratureError(PolyhdivError): pass    # exactness beyond the supported rules
class SolveError(PolyhdivError): pass         # sparse factorization failed
class DomainError(PolyhdivError): pass        # evaluation point outside the polygon
class AdmissibilityError(PolyhdivError): pass # coefficient/dof conditions violated
class SpaceRankError(PolyhdivError): pass     # generators numerically dependent
class UnisolvenceError(PolyhdivError): pass   # transfer matrix singular
class UsageError(PolyhdivError): pass         # bad command line usage

# errors the cli reports as input problems (exit status 2)
INPUT_ERRORS = (GeometryError, MeshError, AdmissibilityError, UsageError)
