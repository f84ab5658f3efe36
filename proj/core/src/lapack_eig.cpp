#include <stdexcept>

#include "floqns/floquet.hpp"

#include <lapacke.h>

namespace floqns {

EigResult dense_eig(const MatC& A, bool vectors) {
  if (A.rows() != A.cols()) throw std::invalid_argument("dense_eig: square matrix required");
  const int n = int(A.rows());
  MatC Ac = A;  // overwritten by the factorization
  VecC w(n);
  MatC vr(vectors ? n : 1, vectors ? n : 1);
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n,
      reinterpret_cast<lapack_complex_double*>(Ac.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
      reinterpret_cast<lapack_complex_double*>(vr.data()), vectors ? n : 1);
  if (info != 0) throw std::runtime_error("dense_eig: zgeev failed");
  EigResult r;
  r.values = std::move(w);
  if (vectors) r.vectors = std::move(vr);
  return r;
}

} // namespace floqns
