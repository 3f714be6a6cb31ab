"""Random streams are addressed by key, so results do not depend on the
order in which work is done or on how it is split across processes."""
from elci import StreamKey, derive_stream

root = StreamKey(2024)
a = derive_stream(root.child("rep", 3)).random(3)
b = derive_stream(root.child("rep", 4)).random(3)
a_again = derive_stream(StreamKey(2024).child("rep", 3)).random(3)

print("rep 3      :", a)
print("rep 4      :", b)
print("rep 3 again:", a_again)
print("identical  :", (a == a_again).all())
