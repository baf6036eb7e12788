use crate::env::LocalTimeProfile;

/// Dense per-site storage that grows in both directions on demand.
#[derive(Debug, Clone)]
pub(crate) struct SiteVec<T> {
    origin: i64,
    data: Vec<T>,
    fill: T,
}

impl<T: Copy + PartialEq> SiteVec<T> {
    pub fn new(center: i64, fill: T) -> Self {
        Self {
            origin: center - 256,
            data: vec![fill; 1024],
            fill,
        }
    }

    #[inline(always)]
    pub fn slot(&mut self, x: i64) -> &mut T {
        let i = x.wrapping_sub(self.origin);
        if i < 0 || i >= self.data.len() as i64 {
            self.grow(x);
        }
        let i = (x - self.origin) as usize;
        &mut self.data[i]
    }

    #[inline(always)]
    pub fn get(&self, x: i64) -> T {
        let i = x.wrapping_sub(self.origin);
        if i < 0 || i >= self.data.len() as i64 {
            self.fill
        } else {
            self.data[i as usize]
        }
    }

    #[cold]
    fn grow(&mut self, x: i64) {
        let len = self.data.len() as i64;
        if x < self.origin {
            let extra = (self.origin - x) + len.max(256);
            let mut v = vec![self.fill; extra as usize];
            v.extend_from_slice(&self.data);
            self.data = v;
            self.origin -= extra;
        } else {
            let need = x - self.origin + 1;
            let new_len = (2 * len).max(need + 256);
            self.data.resize(new_len as usize, self.fill);
        }
    }

    /// Smallest and largest sites holding a non-fill value.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.data.iter().position(|v| *v != self.fill)?;
        let last = self.data.iter().rposition(|v| *v != self.fill)?;
        Some((self.origin + first as i64, self.origin + last as i64))
    }
}

impl SiteVec<u32> {
    #[inline(always)]
    pub fn inc(&mut self, x: i64) -> u32 {
        let s = self.slot(x);
        *s += 1;
        *s
    }

    pub fn to_profile(&self, tail: u64) -> LocalTimeProfile {
        match self.support() {
            None => LocalTimeProfile::new(0, Vec::new(), tail),
            Some((lo, hi)) => LocalTimeProfile::from_fn(lo, hi, tail, |x| self.get(x) as u64),
        }
    }
}
