#include "umbilic/homology.hpp"

#include <algorithm>

namespace umbilic {

MorseComplex morse_complex(const GeneratingFunction& f, const FiberData& fiber,
                           const FlowConfig& cfg) {
  MorseComplex c;
  c.inside = fiber.inside_caustic;
  if (c.inside) {
    c.saddle_gens = {PointLabel::kS1, PointLabel::kS2, PointLabel::kS3};
    c.node_gen = PointLabel::kNode;
    c.differential = incidence_matrix(f, fiber, cfg);
    return c;
  }
  for (const CriticalPoint* s : fiber.saddles()) {
    if (!is_saddle_label(s->label)) throw LabelMismatch("morse_complex: unlabelled saddle");
    c.saddle_gens.push_back(s->label);
  }
  std::sort(c.saddle_gens.begin(), c.saddle_gens.end());
  if (c.saddle_gens.size() != 2) throw LabelMismatch("morse_complex: outside fibre must have two saddles");
  return c;
}

std::array<std::int64_t, 2> HomologyFibre::coords(const std::array<std::int64_t, 3>& chain) const {
  std::array<std::int64_t, 3> v = chain;
  if (relation) {
    std::int64_t c = v[static_cast<std::size_t>(pivot)];
    for (int k = 0; k < 3; ++k)
      v[static_cast<std::size_t>(k)] -= c * (*relation)[k];
  }
  return {v[static_cast<std::size_t>(basis[0])], v[static_cast<std::size_t>(basis[1])]};
}

HomologyFibre homology_fibre(const MorseComplex& c) {
  HomologyFibre h;
  h.gens = c.saddle_gens;
  if (!c.inside) {
    h.ambient = 2;
    h.pivot = -1;
    h.basis = {0, 1};
    return h;
  }
  h.ambient = 3;
  h.relation = c.differential;
  h.pivot = -1;
  for (int k = 0; k < 3; ++k)
    if (c.differential[k] == 1) { h.pivot = k; break; }
  if (h.pivot < 0)
    throw IncompatibleIncidence("zero incidence column: homology rank would be 3");
  int b = 0;
  for (int k = 0; k < 3; ++k)
    if (k != h.pivot) h.basis[static_cast<std::size_t>(b++)] = k;
  return h;
}

IntMat induced_on_homology(const IntMat& chain, const HomologyFibre& src,
                           const HomologyFibre& dst) {
  if (chain.cols != src.ambient || chain.rows != dst.ambient)
    throw Error("induced_on_homology: chain shape does not match the fibres");
  // well-definedness: the image of the source relation must lie in the
  // target relation lattice (or vanish when the target has no relation)
  if (src.relation) {
    std::array<std::int64_t, 3> rel{(*src.relation)[0], (*src.relation)[1], (*src.relation)[2]};
    std::array<std::int64_t, 3> img = chain * rel;
    if (dst.relation) {
      // img must be an integer multiple of the target relation
      std::int64_t mult = 0;
      for (int k = 0; k < dst.ambient; ++k) {
        std::int64_t r = (*dst.relation)[k], w = img[static_cast<std::size_t>(k)];
        if (r == 0) {
          if (w != 0) throw IncompatibleIncidence("chain map does not respect the relations");
        } else if (mult == 0) {
          mult = w / r;
        }
      }
      for (int k = 0; k < dst.ambient; ++k)
        if (img[static_cast<std::size_t>(k)] != mult * (*dst.relation)[k])
          throw IncompatibleIncidence("chain map does not respect the relations");
    } else {
      for (int k = 0; k < dst.ambient; ++k)
        if (img[static_cast<std::size_t>(k)] != 0)
          throw IncompatibleIncidence("chain map does not kill the source relation");
    }
  }

  IntMat m(2, 2);
  for (int col = 0; col < 2; ++col) {
    std::array<std::int64_t, 3> e{0, 0, 0};
    e[static_cast<std::size_t>(src.basis[static_cast<std::size_t>(col)])] = 1;
    std::array<std::int64_t, 3> w = chain * e;
    auto coords = dst.coords(w);
    m.at(0, col) = coords[0];
    m.at(1, col) = coords[1];
  }
  std::int64_t d = m.det();
  if (d != 1 && d != -1) throw IncompatibleIncidence("induced homology map is not invertible over Z");
  return m;
}

GlueMap caustic_glue(const HomologyFibre& outside, const HomologyFibre& inside,
                     PointLabel dying, Direction direction) {
  if (inside.ambient != 3 || outside.ambient != 2)
    throw LabelMismatch("caustic_glue: fibres are not an outside/inside pair");
  int dslot = saddle_slot(dying);
  if (!inside.relation || (*inside.relation)[dslot] != 1)
    throw IncompatibleIncidence("caustic_glue: dying saddle lacks a gradient line from the node");
  // the outside generators must be the two survivors, in label order
  std::vector<PointLabel> survivors;
  for (int k = 0; k < 3; ++k)
    if (k != dslot) survivors.push_back(saddle_label(k));
  if (outside.gens != survivors)
    throw LabelMismatch("caustic_glue: outside generators do not match the surviving labels");

  GlueMap g;
  g.direction = direction;
  if (direction == Direction::kForward) {  // outside -> inside inclusion
    IntMat chain(3, 2);
    for (int k = 0; k < 2; ++k)
      chain.at(saddle_slot(survivors[static_cast<std::size_t>(k)]), k) = 1;
    g.chain = chain;
    g.induced = induced_on_homology(chain, outside, inside);
  } else {  // inside -> outside read-off: normalize the dying slot to zero
    IntMat chain(2, 3);
    for (int k = 0; k < 2; ++k) {
      int a = saddle_slot(survivors[static_cast<std::size_t>(k)]);
      chain.at(k, a) += 1;
      chain.at(k, dslot) -= (*inside.relation)[a];
    }
    g.chain = chain;
    g.induced = induced_on_homology(chain, inside, outside);
  }
  return g;
}

WallMatrixResult wall_matrix(const IncidenceMatrix& I_U, const IncidenceMatrix& I_V, int i, int j,
                             std::optional<int> tau_policy) {
  if (i < 1 || i > 3 || j < 1 || j > 3 || i == j)
    throw Error("wall_matrix: bad separatrix pair");
  int flips = 0, flip_slot = -1;
  for (int k = 0; k < 3; ++k)
    if (I_U[k] != I_V[k]) { ++flips; flip_slot = k; }
  if (flips > 1)
    throw IncompatibleIncidence("incidence matrices differ in more than one entry");

  WallMatrixResult r;
  if (flips == 1) {
    if (flip_slot != i - 1)
      throw IncompatibleIncidence("changed incidence entry is not the wall's target saddle");
    if (I_U[j - 1] != 1)
      throw IncompatibleIncidence("no tau in {-1,0,1} satisfies the wall equation");
    r.tau = I_V[i - 1] - I_U[i - 1];  // +-1
  } else {
    if (I_U[j - 1] == 1) {
      r.tau = 0;  // forced by the equation
    } else if (tau_policy) {
      r.tau = *tau_policy;
    } else {
      r.tau = 0;
      r.tau_defaulted = true;
    }
  }
  r.chain = IntMat::elementary(3, i, j, r.tau);
  return r;
}

IntMat wall_matrix_outside(const IntMat& chain3, int i, int j, int j_dying) {
  if (chain3.rows != 3 || chain3.cols != 3) throw Error("wall_matrix_outside: needs a 3x3 matrix");
  if (j_dying < 1 || j_dying > 3) throw Error("wall_matrix_outside: bad dying label");
  if (j_dying == i || j_dying == j)
    throw LabelMismatch("wall_matrix_outside: the separatrix pair must survive the fold");
  return chain3.delete_row_col(j_dying - 1);
}

IntMat cusp_fold_composition(PointLabel enter_dying, PointLabel exit_dying, CuspCase c) {
  int in = saddle_slot(enter_dying), out = saddle_slot(exit_dying);
  if (in == out) throw UnknownCase("cusp folds must kill different saddles");
  int far = 3 - in - out;

  // incidence next to the cusp: all ones in case A, far saddle starved in case B
  std::array<int, 3> I{1, 1, 1};
  if (c == CuspCase::kB) I[static_cast<std::size_t>(far)] = 0;

  // entry survivors and exit survivors in label order
  std::array<int, 2> a{}, b{};
  for (int k = 0, m = 0; k < 3; ++k)
    if (k != in) a[static_cast<std::size_t>(m++)] = k;
  for (int k = 0, m = 0; k < 3; ++k)
    if (k != out) b[static_cast<std::size_t>(m++)] = k;

  // include at entry survivors, normalize the exit slot, read exit survivors
  IntMat m(2, 2);
  for (int l = 0; l < 2; ++l) {
    int al = a[static_cast<std::size_t>(l)];
    for (int k = 0; k < 2; ++k) {
      int bk = b[static_cast<std::size_t>(k)];
      std::int64_t v = (bk == al) ? 1 : 0;
      if (al == out) v -= I[static_cast<std::size_t>(bk)];
      m.at(k, l) = v;
    }
  }
  return m;
}

IntMat cusp_twist(PointLabel enter_dying, PointLabel exit_dying, CuspCase c) {
  return cusp_fold_composition(enter_dying, exit_dying, c).unimodular_inverse();
}

IntMat split_twist_chain_glue(const IncidenceMatrix& I) {
  if (!(I[0] == 1 && I[1] == 1 && I[2] == 1))
    throw WrongIncidence("chain splitting needs the all-ones incidence column");
  return IntMat(3, 3, {1, -1, -1, 0, -1, 0, 0, 0, -1});
}

}  // namespace umbilic
