// Copyright 2026 The distinf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DISTINF_HIGH_PRECISION_H_
#define DISTINF_HIGH_PRECISION_H_

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace distinf {

// 50 decimal digits. The leakage closed forms are instantiated for this type
// so that compositions such as n_leaked(bound(n)) can be checked far past
// the point where 1 - omega underflows double precision.
using HighPrecision = boost::multiprecision::cpp_bin_float_50;

}  // namespace distinf

#endif  // DISTINF_HIGH_PRECISION_H_
