#pragma once

namespace aigc::crypto {

void ensure_sodium();

}  // namespace aigc::crypto
