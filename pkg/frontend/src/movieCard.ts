import type { MovieEntry } from './types';

export interface CardActions {
  onOpen(movieId: number): void;
  onRate(movieId: number, value: number): Promise<void>;
  onWishlist(movieId: number): Promise<void>;
}

const HALF_STARS = Array.from({ length: 10 }, (_, i) => (i + 1) / 2);

/**
 * One movie tile: open-detail click, a half-star rating picker, and a
 * wishlist button. Mutations are optimistic and roll back on server errors.
 */
export function createMovieCard(movie: MovieEntry, actions: CardActions): HTMLElement {
  const card = document.createElement('div');
  card.className = 'movie-card';
  card.dataset.movieId = String(movie.movie_id);

  const title = document.createElement('a');
  title.className = 'movie-title';
  title.href = '#';
  title.textContent = movie.title;
  title.addEventListener('click', (event) => {
    event.preventDefault();
    actions.onOpen(movie.movie_id);
  });

  const score = document.createElement('span');
  score.className = 'predicted-score';
  score.textContent = movie.score.toFixed(1);

  const rating = document.createElement('select');
  rating.className = 'rating-picker';
  const placeholder = document.createElement('option');
  placeholder.value = '';
  placeholder.textContent = 'rate';
  rating.appendChild(placeholder);
  for (const value of HALF_STARS) {
    const option = document.createElement('option');
    option.value = String(value);
    option.textContent = `${value} stars`;
    rating.appendChild(option);
  }
  rating.addEventListener('change', () => {
    const value = Number(rating.value);
    if (!value) return;
    const previous = '';
    rating.disabled = true;
    actions
      .onRate(movie.movie_id, value)
      .catch(() => {
        rating.value = previous; // rollback on rejection
      })
      .finally(() => {
        rating.disabled = false;
      });
  });

  const wishlist = document.createElement('button');
  wishlist.type = 'button';
  wishlist.className = 'wishlist-button';
  wishlist.textContent = '+ wishlist';
  wishlist.addEventListener('click', () => {
    const before = wishlist.textContent;
    wishlist.textContent = 'wishlisted';
    wishlist.disabled = true;
    actions.onWishlist(movie.movie_id).catch(() => {
      wishlist.textContent = before;
      wishlist.disabled = false;
    });
  });

  card.append(title, score, rating, wishlist);
  return card;
}
