#ifndef LATENTPRIV_ATTACKS_HPP
#define LATENTPRIV_ATTACKS_HPP

#include <cstdint>
#include <vector>

#include "latentpriv/mlp.hpp"
#include "latentpriv/parallel.hpp"

namespace latentpriv {

enum class AttackNorm { L2, Linf };

struct AttackConfig {
  double epsilon = 1.0;   // ball radius
  AttackNorm norm = AttackNorm::L2;
  int steps = 10;         // T_a
  double step_size = 0.3; // eta

  void validate() const;
};

// Projection onto the epsilon ball around center: per-coordinate clamp for
// Linf, rescale of (x - center) for L2.
Vec project_ball(const Vec& x, const Vec& center, double epsilon,
                 AttackNorm norm);

// Fast gradient sign: z + epsilon * sign(grad_z loss), with sign(0) := 0.
Vec fgsm(const MlpClassifier& c, const Vec& z, int y, double epsilon);

// Projected gradient method ascending the loss: iterates
//   z^{t+1} = Pi_{B_eps(z^0)}( z^t + eta * v~^t )
// where v~ = eps * grad/||grad||_2 (L2) or eps * sign(grad) (Linf), the
// dual-norm maximizer of v . grad over the ball. Projection is taken around
// the ORIGINAL point, so every iterate satisfies ||z^t - z^0||_p <= eps.
Vec pgm(const MlpClassifier& c, const Vec& z, int y, const AttackConfig& cfg);

// PGM over a batch; samples are independent so they run in parallel.
std::vector<Vec> attack_batch(const MlpClassifier& c,
                              const std::vector<Vec>& zs,
                              const std::vector<int>& ys,
                              const AttackConfig& cfg,
                              ExecMode mode = ExecMode::Parallel);

}  // namespace latentpriv

#endif  // LATENTPRIV_ATTACKS_HPP
