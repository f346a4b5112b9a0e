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

#include "barbie/crypto/crypto.h"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/kdf.h>
#include <openssl/sha.h>

#include <cstdlib>
#include <memory>

namespace barbie::crypto {
namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* key) const { EVP_PKEY_free(key); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* ctx) const { EVP_PKEY_CTX_free(ctx); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

[[noreturn]] void Fatal() { std::abort(); }

const EVP_CIPHER* GcmCipher(size_t key_size) {
  switch (key_size) {
    case 16:
      return EVP_aes_128_gcm();
    case 32:
      return EVP_aes_256_gcm();
    default:
      return nullptr;
  }
}

}  // namespace

Digest Sha256(ByteSpan data) {
  Digest out;
  SHA256(data.data(), data.size(), out.data());
  return out;
}

Digest HmacSha256(ByteSpan key, ByteSpan data) {
  Digest out;
  unsigned int len = 0;
  static const uint8_t kEmpty = 0;
  if (HMAC(EVP_sha256(), key.empty() ? &kEmpty : key.data(),
           static_cast<int>(key.size()), data.data(), data.size(), out.data(),
           &len) == nullptr) {
    Fatal();
  }
  return out;
}

Bytes HkdfSha256(ByteSpan ikm, ByteSpan salt, ByteSpan info, size_t length) {
  PkeyCtx ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr));
  Bytes out(length);
  size_t out_len = length;
  static const uint8_t kZeros[32] = {};
  ByteSpan effective_salt = salt.empty() ? ByteSpan(kZeros, 32) : salt;
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
      EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()) <= 0 ||
      EVP_PKEY_CTX_set1_hkdf_salt(ctx.get(), effective_salt.data(),
                                  static_cast<int>(effective_salt.size())) <= 0 ||
      EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), ikm.data(),
                                 static_cast<int>(ikm.size())) <= 0 ||
      EVP_PKEY_CTX_add1_hkdf_info(ctx.get(), info.data(),
                                  static_cast<int>(info.size())) <= 0 ||
      EVP_PKEY_derive(ctx.get(), out.data(), &out_len) <= 0 ||
      out_len != length) {
    Fatal();
  }
  return out;
}

StatusOr<Bytes> AeadSeal(ByteSpan key, ByteSpan plaintext, ByteSpan aad,
                         RandomSource& rng) {
  const EVP_CIPHER* cipher = GcmCipher(key.size());
  if (cipher == nullptr) {
    return MakeError(ErrorCode::kInvalidArgument, "AEAD key must be 16 or 32 bytes");
  }
  Bytes out(kGcmIvSize + plaintext.size() + kGcmTagSize);
  rng.Fill(std::span<uint8_t>(out.data(), kGcmIvSize));

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx ||
      EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key.data(), out.data()) != 1) {
    Fatal();
  }
  if (!aad.empty() &&
      EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    Fatal();
  }
  uint8_t* ct = out.data() + kGcmIvSize;
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), ct, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1) {
    Fatal();
  }
  if (EVP_EncryptFinal_ex(ctx.get(), ct + plaintext.size(), &len) != 1 ||
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagSize,
                          ct + plaintext.size()) != 1) {
    Fatal();
  }
  return out;
}

StatusOr<Bytes> AeadOpen(ByteSpan key, ByteSpan sealed, ByteSpan aad) {
  const EVP_CIPHER* cipher = GcmCipher(key.size());
  if (cipher == nullptr) {
    return MakeError(ErrorCode::kInvalidArgument, "AEAD key must be 16 or 32 bytes");
  }
  if (sealed.size() < kGcmIvSize + kGcmTagSize) {
    return MakeError(ErrorCode::kBadCiphertext, "ciphertext too short");
  }
  size_t ct_len = sealed.size() - kGcmIvSize - kGcmTagSize;
  const uint8_t* ct = sealed.data() + kGcmIvSize;
  Bytes tag(ct + ct_len, ct + ct_len + kGcmTagSize);
  Bytes out(ct_len);

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  int len = 0;
  if (!ctx ||
      EVP_DecryptInit_ex(ctx.get(), cipher, nullptr, key.data(), sealed.data()) != 1) {
    Fatal();
  }
  if (!aad.empty() &&
      EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                        static_cast<int>(aad.size())) != 1) {
    Fatal();
  }
  if (ct_len > 0 &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct,
                        static_cast<int>(ct_len)) != 1) {
    Fatal();
  }
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagSize,
                          tag.data()) != 1) {
    Fatal();
  }
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + ct_len, &len) != 1) {
    return MakeError(ErrorCode::kBadCiphertext, "authentication tag mismatch");
  }
  return out;
}

X25519KeyPair X25519FromPrivate(const ByteArray<32>& private_key) {
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                        private_key.data(), private_key.size()));
  if (!key) Fatal();
  X25519KeyPair pair{private_key, {}};
  size_t len = pair.public_key.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &len) != 1) {
    Fatal();
  }
  return pair;
}

X25519KeyPair X25519Generate(RandomSource& rng) {
  return X25519FromPrivate(rng.Array<32>());
}

StatusOr<ByteArray<32>> X25519SharedSecret(const ByteArray<32>& private_key,
                                           ByteSpan peer_public) {
  if (peer_public.size() != kX25519KeySize) {
    return MakeError(ErrorCode::kProtocolError, "DH public value must be 32 bytes");
  }
  Pkey own(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                        private_key.data(), private_key.size()));
  Pkey peer(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr,
                                        peer_public.data(), peer_public.size()));
  if (!own || !peer) {
    return MakeError(ErrorCode::kProtocolError, "invalid DH public value");
  }
  PkeyCtx ctx(EVP_PKEY_CTX_new(own.get(), nullptr));
  ByteArray<32> secret;
  size_t len = secret.size();
  if (!ctx || EVP_PKEY_derive_init(ctx.get()) <= 0 ||
      EVP_PKEY_derive_set_peer(ctx.get(), peer.get()) <= 0 ||
      EVP_PKEY_derive(ctx.get(), secret.data(), &len) <= 0 || len != 32) {
    // OpenSSL rejects peers that produce the all-zero secret (small order).
    return MakeError(ErrorCode::kProtocolError, "DH public value is not a valid group element");
  }
  return secret;
}

Ed25519KeyPair Ed25519FromSeed(const ByteArray<32>& seed) {
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(),
                                        seed.size()));
  if (!key) Fatal();
  Ed25519KeyPair pair{seed, {}};
  size_t len = pair.public_key.size();
  if (EVP_PKEY_get_raw_public_key(key.get(), pair.public_key.data(), &len) != 1) {
    Fatal();
  }
  return pair;
}

Ed25519KeyPair Ed25519Generate(RandomSource& rng) {
  return Ed25519FromSeed(rng.Array<32>());
}

ByteArray<64> Ed25519Sign(const ByteArray<32>& seed, ByteSpan message) {
  Pkey key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(),
                                        seed.size()));
  MdCtx ctx(EVP_MD_CTX_new());
  ByteArray<64> sig;
  size_t len = sig.size();
  if (!key || !ctx ||
      EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1 ||
      EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1) {
    Fatal();
  }
  return sig;
}

bool Ed25519Verify(ByteSpan public_key, ByteSpan message, ByteSpan signature) {
  if (public_key.size() != kEd25519PublicKeySize ||
      signature.size() != kEd25519SignatureSize) {
    return false;
  }
  Pkey key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                       public_key.data(), public_key.size()));
  MdCtx ctx(EVP_MD_CTX_new());
  if (!key || !ctx ||
      EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
    return false;
  }
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

}  // namespace barbie::crypto
