// antispoof/include/antispoof/ocs.h

// Copyright 2026  The antispoof Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// One-class softmax loss on unit-norm embeddings.  Label 0 is the target
// (bonafide) class, label 1 the spoof class.  With s_i = w.x_i,
//
//   L = (1/N) sum_i softplus(alpha (m_{y_i} - s_i) (-1)^{y_i})
//
// so bonafide embeddings are pushed above cosine m0 and spoofs below m1.

#ifndef ANTISPOOF_OCS_H_
#define ANTISPOOF_OCS_H_

#include <span>
#include <vector>

#include "antispoof/matrix.h"

namespace antispoof {

struct OcsParams {
  double alpha = 20.0;
  double m0 = 0.9;
  double m1 = 0.2;
  std::vector<double> w0_hat;  // unit norm

  /// Throws std::invalid_argument unless alpha > 0, -1 <= m1 < m0 <= 1 and
  /// |w0_hat| = 1 within 1e-9.
  void Check() const;
};

struct OcsGradient {
  Matrix d_embeddings;        // N x d
  std::vector<double> d_w0;   // d
};

/// log(1 + e^z) without overflow.
double Softplus(double z);

/// Checks the parameters, the labels and that every embedding row has unit
/// norm within 1e-6; throws std::invalid_argument otherwise.
double OcsLoss(const Matrix &embeddings, std::span<const int> labels, const OcsParams &p);
OcsGradient OcsGrad(const Matrix &embeddings, std::span<const int> labels,
                    const OcsParams &p);

/// Same formulas with only shape and label checks, so perturbed points off
/// the unit sphere can be evaluated (finite differences).
double OcsLossUnchecked(const Matrix &embeddings, std::span<const int> labels,
                        const OcsParams &p);
OcsGradient OcsGradUnchecked(const Matrix &embeddings, std::span<const int> labels,
                             const OcsParams &p);

}  // namespace antispoof

#endif  // ANTISPOOF_OCS_H_
