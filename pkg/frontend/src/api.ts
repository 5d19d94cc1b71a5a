import type { BroadPage, HomePayload, SessionInfo } from './types';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

type FetchLike = typeof fetch;

/** Thin typed client for the recommender service JSON API. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body === 'object' && body !== null && 'detail' in body
          ? String((body as { detail: unknown }).detail)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  openSession(userId: number): Promise<SessionInfo> {
    return this.post<SessionInfo>('/session', { user_id: userId });
  }

  home(token: string): Promise<HomePayload> {
    return this.request<HomePayload>(`/home?token=${encodeURIComponent(token)}`);
  }

  broadPage(token: string, page: number): Promise<BroadPage> {
    return this.request<BroadPage>(
      `/broad?token=${encodeURIComponent(token)}&page=${page}`,
    );
  }

  setLevel(token: string, level: number): Promise<BroadPage> {
    return this.post<BroadPage>('/level', { token, level });
  }

  rate(token: string, movieId: number, value: number): Promise<unknown> {
    return this.post('/rating', { token, movie_id: movieId, value });
  }

  addToWishlist(token: string, movieId: number): Promise<{ added: boolean }> {
    return this.post('/wishlist', { token, movie_id: movieId });
  }

  sendEvent(
    token: string,
    kind: 'page_view' | 'carousel_click' | 'logout' | 'info_ack',
    movieId?: number,
    treatment?: string,
  ): Promise<unknown> {
    return this.post('/event', {
      token,
      kind,
      movie_id: movieId ?? null,
      treatment: treatment ?? null,
    });
  }
}
