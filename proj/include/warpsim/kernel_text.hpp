#pragma once

#include <string>

#include "warpsim/kernel_ir.hpp"

namespace warpsim {

// S-expression form of a kernel, e.g.
//
//   (kernel
//     (param draws int)
//     (param cnt array)
//     (local u real)
//     (body
//       (assign u (draw))
//       (if (lt u 0.5)
//         (then
//           (store cnt 0 u)))))
//
// Declared names must be plain identifiers; special registers appear as the
// bare tokens tid.x tid.y tid.z bid.x bid.y bdim.x bdim.y bdim.z gdim.x
// gdim.y warpsize. Real literals always carry a decimal point or exponent so
// they stay distinguishable from integers. dump/parse round-trip exactly.
std::string dump_kernel(const KernelProgram& prog);

// Throws ParseError with a line reference on malformed input.
KernelProgram parse_kernel(const std::string& text);

}  // namespace warpsim
