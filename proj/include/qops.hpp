// Copyright 2026 The QOPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QOPS_QOPS_HPP
#define QOPS_QOPS_HPP

#include "qops/bench.hpp"
#include "qops/circuit.hpp"
#include "qops/families.hpp"
#include "qops/mutation.hpp"
#include "qops/noise.hpp"
#include "qops/pauli.hpp"
#include "qops/qasm.hpp"
#include "qops/spec_store.hpp"
#include "qops/statevector.hpp"
#include "qops/test_case.hpp"
#include "qops/test_engine.hpp"

#endif  // QOPS_QOPS_HPP
