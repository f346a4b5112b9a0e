// Copyright 2026 The BarbiE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BARBIE_CRYPTO_CRYPTO_H_
#define BARBIE_CRYPTO_CRYPTO_H_

#include <string_view>

#include "barbie/common/bytes.h"
#include "barbie/common/random.h"
#include "barbie/common/status.h"

// Thin wrappers over OpenSSL's EVP interface. Every primitive the service
// needs goes through here so the rest of the code never touches OpenSSL.
namespace barbie::crypto {

inline constexpr size_t kGcmIvSize = 12;
inline constexpr size_t kGcmTagSize = 16;
inline constexpr size_t kX25519KeySize = 32;
inline constexpr size_t kEd25519PublicKeySize = 32;
inline constexpr size_t kEd25519SeedSize = 32;
inline constexpr size_t kEd25519SignatureSize = 64;

Digest Sha256(ByteSpan data);
Digest HmacSha256(ByteSpan key, ByteSpan data);

// RFC 5869. An empty salt means HashLen zero bytes.
Bytes HkdfSha256(ByteSpan ikm, ByteSpan salt, ByteSpan info, size_t length);

// AES-GCM with a 128- or 256-bit key (picked by key length). Output layout is
// iv(12) || ciphertext || tag(16); the iv is drawn from `rng`.
StatusOr<Bytes> AeadSeal(ByteSpan key, ByteSpan plaintext, ByteSpan aad,
                         RandomSource& rng = DefaultRandom());

// Inverse of AeadSeal. Any authentication failure (wrong key, wrong aad,
// modified or truncated input) yields kBadCiphertext.
StatusOr<Bytes> AeadOpen(ByteSpan key, ByteSpan sealed, ByteSpan aad);

struct X25519KeyPair {
  ByteArray<32> private_key;
  ByteArray<32> public_key;
};

X25519KeyPair X25519Generate(RandomSource& rng = DefaultRandom());
X25519KeyPair X25519FromPrivate(const ByteArray<32>& private_key);

// Fails with kProtocolError for malformed or low-order peer points.
StatusOr<ByteArray<32>> X25519SharedSecret(const ByteArray<32>& private_key,
                                           ByteSpan peer_public);

struct Ed25519KeyPair {
  ByteArray<32> seed;
  ByteArray<32> public_key;
};

Ed25519KeyPair Ed25519Generate(RandomSource& rng = DefaultRandom());
Ed25519KeyPair Ed25519FromSeed(const ByteArray<32>& seed);
ByteArray<64> Ed25519Sign(const ByteArray<32>& seed, ByteSpan message);
bool Ed25519Verify(ByteSpan public_key, ByteSpan message, ByteSpan signature);

}  // namespace barbie::crypto

#endif  // BARBIE_CRYPTO_CRYPTO_H_
