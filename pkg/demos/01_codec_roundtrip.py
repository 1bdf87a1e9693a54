"""A block through the codec: split, expand, lose packets, recover.

The two properties everything else builds on:
  expandable      - any number of encoded symbols on demand
  interchangeable - ANY k useful symbols reconstruct the block
"""

import numpy as np

from fountainflow.codec import BlockDecoder, BlockEncoder, SourceBlock

rng = np.random.default_rng(7)
data = rng.integers(0, 256, 5 * 1250 - 300, dtype=np.uint8).tobytes()
block = SourceBlock(block_id=0, data=data, symbol_size=1250)
print(f"block: {len(data)} bytes -> k = {block.k} symbols of {block.symbol_size}B")

enc = BlockEncoder(block)
print("\nsystematic prefix: esi < k returns source bytes verbatim")
print("  symbol(1)[:8] =", enc.symbol(1)[:8].hex(), "== data slice:",
      enc.symbol(1)[:8] == data[1250:1258])

print("\nexpandable: five repair symbols beyond k, generated on demand")
for esi in range(5, 10):
    print(f"  esi {esi}: {enc.symbol(esi)[:8].hex()}...")

print("\nnow lose the middle three source packets (esi 1, 2, 3)")
received = [0, 4, 7, 8, 9]  # two source symbols + three repairs
dec = BlockDecoder(0, block.k, 1250, len(data))
for esi in received:
    innovative = dec.add(esi, enc.symbol(esi))
    print(f"  add esi {esi}: rank {dec.rank}/{block.k}"
          + ("  <- decoded!" if dec.decoded else ""))

out = dec.try_finish()
print("\nrecovered bytes identical:", out == data)

print("\ninterchangeable: a completely different symbol set, same result")
dec2 = BlockDecoder(0, block.k, 1250, len(data))
for esi in (100, 2, 55, 31, 12):
    dec2.add(esi, enc.symbol(esi))
print("  decoded from {100,2,55,31,12}:", dec2.try_finish() == data)
