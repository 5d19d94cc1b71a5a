export type Treatment = 'Control' | 'BRC' | 'BRC_DS';

export interface SessionInfo {
  token: string;
  user_id: number;
  arm: string;
  treatment: Treatment;
  level: number;
  info_message: string | null;
}

export interface MovieEntry {
  movie_id: number;
  title: string;
  score: number;
}

export interface PageSlot extends MovieEntry {
  cluster_id: number;
}

export interface BroadPage {
  page_index: number;
  degraded: boolean;
  slots: PageSlot[];
  level?: number | null;
}

export interface HomePayload {
  arm: string;
  treatment: Treatment;
  top_picks: MovieEntry[];
  broad: BroadPage | null;
  level: number | null;
}
